#pragma once

#include "gbd/catalog.hpp"
#include "gbd/descriptor.hpp"
#include "gbd/diagram.hpp"
#include "gbd/errors.hpp"
#include "gbd/matrix.hpp"
#include "gbd/measures.hpp"
#include "gbd/numeric.hpp"
#include "gbd/order.hpp"
#include "gbd/spectral.hpp"
#include "gbd/version.hpp"
#include "gbd/vershik.hpp"
