// saev.hpp - convenience umbrella include
#pragma once

#include "saev/csv.hpp"
#include "saev/diagnostics.hpp"
#include "saev/golden.hpp"
#include "saev/graph.hpp"
#include "saev/matching.hpp"
#include "saev/network.hpp"
#include "saev/queueing.hpp"
#include "saev/rng.hpp"
#include "saev/scenario.hpp"
#include "saev/scheduler.hpp"
#include "saev/sim.hpp"
#include "saev/time.hpp"
#include "saev/vehicle.hpp"
