#pragma once

#include "piv/backlund.hpp"
#include "piv/core.hpp"
#include "piv/formal_gauge.hpp"
#include "piv/integrate.hpp"
#include "piv/isomonodromy.hpp"
#include "piv/mat_poly.hpp"
#include "piv/monodromy.hpp"
#include "piv/noumi_yamada.hpp"
#include "piv/rank2_moduli.hpp"
#include "piv/rational.hpp"
#include "piv/third_poly.hpp"
