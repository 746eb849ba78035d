#pragma once

#include "proxipair/harness/instance_file.hpp"
#include "proxipair/harness/fixtures.hpp"
#include "proxipair/harness/run.hpp"
#include "proxipair/harness/verify.hpp"
