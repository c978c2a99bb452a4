#pragma once

#include "lnstab/catalog.hpp"
#include "lnstab/error.hpp"
#include "lnstab/expr.hpp"
#include "lnstab/floquet.hpp"
#include "lnstab/linalg.hpp"
#include "lnstab/lognorm.hpp"
#include "lnstab/matrix.hpp"
#include "lnstab/norms.hpp"
#include "lnstab/ode.hpp"
#include "lnstab/periodic.hpp"
#include "lnstab/perturb.hpp"
#include "lnstab/quadrature.hpp"
#include "lnstab/settings.hpp"
#include "lnstab/system.hpp"
