#pragma once

// Umbrella header.

#include "torusdist/acceptance.hpp"
#include "torusdist/json_io.hpp"
#include "torusdist/kempf_ness.hpp"
#include "torusdist/lattice.hpp"
#include "torusdist/lifting.hpp"
#include "torusdist/linalg.hpp"
#include "torusdist/logspace.hpp"
#include "torusdist/normal_form.hpp"
#include "torusdist/numeric.hpp"
#include "torusdist/rop.hpp"
#include "torusdist/spectral.hpp"
#include "torusdist/torus.hpp"
#include "torusdist/transcendental.hpp"
