#pragma once

#include "iterx/apf.hpp"
#include "iterx/complex_roots.hpp"
#include "iterx/dynamics.hpp"
#include "iterx/error.hpp"
#include "iterx/modp.hpp"
#include "iterx/newton.hpp"
#include "iterx/padic.hpp"
#include "iterx/poly.hpp"
#include "iterx/preimage.hpp"
#include "iterx/quadratic.hpp"
#include "iterx/ramification.hpp"
#include "iterx/rat.hpp"
#include "iterx/rational_map.hpp"
#include "iterx/tower.hpp"
#include "iterx/witness.hpp"
