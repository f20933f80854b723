#pragma once

#include "uavrt/antenna.hpp"
#include "uavrt/channel.hpp"
#include "uavrt/geometry.hpp"
#include "uavrt/io.hpp"
#include "uavrt/materials.hpp"
#include "uavrt/pipeline.hpp"
#include "uavrt/raytracer.hpp"
#include "uavrt/scenario.hpp"
#include "uavrt/simulation.hpp"
#include "uavrt/stats.hpp"
