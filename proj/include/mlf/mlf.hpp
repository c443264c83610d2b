#pragma once

#include "mlf/errors.hpp"
#include "mlf/numeric.hpp"
#include "mlf/quadrature.hpp"
#include "mlf/series.hpp"
#include "mlf/asymptotics.hpp"
#include "mlf/plana.hpp"
#include "mlf/laplace.hpp"
#include "mlf/order.hpp"
#include "mlf/holonomy.hpp"
#include "mlf/sweep.hpp"
