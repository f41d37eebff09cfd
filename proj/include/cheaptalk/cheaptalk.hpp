#pragma once

#include "cheaptalk/bounds.hpp"
#include "cheaptalk/costs.hpp"
#include "cheaptalk/density_file.hpp"
#include "cheaptalk/distributions.hpp"
#include "cheaptalk/equilibrium.hpp"
#include "cheaptalk/errors.hpp"
#include "cheaptalk/exponential.hpp"
#include "cheaptalk/informativeness.hpp"
#include "cheaptalk/json_writer.hpp"
#include "cheaptalk/lambert_w.hpp"
#include "cheaptalk/normal.hpp"
#include "cheaptalk/oracle.hpp"
#include "cheaptalk/parallel.hpp"
#include "cheaptalk/quadrature.hpp"
#include "cheaptalk/quantizer.hpp"
#include "cheaptalk/roots.hpp"
#include "cheaptalk/serialize.hpp"
