#pragma once

#include "proxipair/body.hpp"
#include "proxipair/error.hpp"
#include "proxipair/instance.hpp"
#include "proxipair/mappings.hpp"
#include "proxipair/operators.hpp"
#include "proxipair/sampling.hpp"
#include "proxipair/solvers.hpp"
#include "proxipair/space.hpp"
