#pragma once

#include "common.hpp"
#include "config.hpp"
#include "config_file.hpp"
#include "control_plane.hpp"
#include "experiments.hpp"
#include "flows.hpp"
#include "io_engine.hpp"
#include "kernel_model.hpp"
#include "kernels.hpp"
#include "matching.hpp"
#include "metrics.hpp"
#include "presets.hpp"
#include "rng.hpp"
#include "scheduler.hpp"
#include "simulator.hpp"
#include "traffic.hpp"
