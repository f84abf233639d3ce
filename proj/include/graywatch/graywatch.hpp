#pragma once

// Umbrella include for the whole simulator.

#include "graywatch/arbitration.hpp"
#include "graywatch/behavior.hpp"
#include "graywatch/config.hpp"
#include "graywatch/event_queue.hpp"
#include "graywatch/metrics.hpp"
#include "graywatch/monitoring.hpp"
#include "graywatch/network.hpp"
#include "graywatch/packets.hpp"
#include "graywatch/pbh.hpp"
#include "graywatch/rng.hpp"
#include "graywatch/scenario.hpp"
#include "graywatch/sha256.hpp"
#include "graywatch/sweep.hpp"
#include "graywatch/topology.hpp"
#include "graywatch/trace.hpp"
#include "graywatch/types.hpp"
