#pragma once

// Umbrella header.

#include "conical/rational.hpp"
#include "conical/linalg.hpp"
#include "conical/cone.hpp"
#include "conical/subdivision.hpp"
#include "conical/germ.hpp"
#include "conical/coalgebra.hpp"
#include "conical/euler_maclaurin.hpp"
#include "conical/catalog.hpp"
#include "conical/acceptance.hpp"
#include "conical/io.hpp"
