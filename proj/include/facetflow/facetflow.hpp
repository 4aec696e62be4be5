#pragma once

#include "facetflow/canonical_restriction.hpp"
#include "facetflow/certificate.hpp"
#include "facetflow/conjugate_oracle.hpp"
#include "facetflow/csv.hpp"
#include "facetflow/energy_density.hpp"
#include "facetflow/errors.hpp"
#include "facetflow/facet_extension.hpp"
#include "facetflow/flow.hpp"
#include "facetflow/grid.hpp"
#include "facetflow/radial_profile.hpp"
#include "facetflow/richardson.hpp"
#include "facetflow/rng.hpp"
#include "facetflow/slope_check.hpp"
#include "facetflow/smooth_fn.hpp"
#include "facetflow/vec.hpp"
