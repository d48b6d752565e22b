#pragma once

#include "criterion.hpp"
#include "game_core.hpp"
#include "induction.hpp"
#include "polytope.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "simulate.hpp"
