#pragma once

#include "landau/barriers.hpp"
#include "landau/coefficients.hpp"
#include "landau/errors.hpp"
#include "landau/exponents.hpp"
#include "landau/grid.hpp"
#include "landau/holder.hpp"
#include "landau/hydro.hpp"
#include "landau/initial.hpp"
#include "landau/kinetic.hpp"
#include "landau/quadrature.hpp"
#include "landau/snapshot.hpp"
#include "landau/solver.hpp"
#include "landau/stencil.hpp"
