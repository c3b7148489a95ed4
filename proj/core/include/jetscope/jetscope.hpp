#pragma once

#include "jetscope/classify.hpp"
#include "jetscope/discrete.hpp"
#include "jetscope/distribution.hpp"
#include "jetscope/error.hpp"
#include "jetscope/field_io.hpp"
#include "jetscope/grid.hpp"
#include "jetscope/jet.hpp"
#include "jetscope/jets.hpp"
#include "jetscope/multi_index.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/pde.hpp"
#include "jetscope/polynomial.hpp"
#include "jetscope/quadrature.hpp"
#include "jetscope/report.hpp"
#include "jetscope/rescale.hpp"
#include "jetscope/signals.hpp"
#include "jetscope/test_function.hpp"
#include "jetscope/whitney.hpp"
