#pragma once

#include "toepricc/analysis.hpp"
#include "toepricc/diagnostics.hpp"
#include "toepricc/errors.hpp"
#include "toepricc/factorization.hpp"
#include "toepricc/json_io.hpp"
#include "toepricc/linalg.hpp"
#include "toepricc/matrix.hpp"
#include "toepricc/parallel.hpp"
#include "toepricc/realization.hpp"
#include "toepricc/riccati.hpp"
#include "toepricc/section.hpp"
#include "toepricc/toeplitz.hpp"
