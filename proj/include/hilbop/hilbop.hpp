#pragma once

#include "hilbop/error.hpp"
#include "hilbop/special.hpp"
#include "hilbop/quadrature.hpp"
#include "hilbop/fft.hpp"
#include "hilbop/measure.hpp"
#include "hilbop/series.hpp"
#include "hilbop/norms.hpp"
#include "hilbop/hilbert_op.hpp"
#include "hilbop/theorem_lab.hpp"
#include "hilbop/io.hpp"
