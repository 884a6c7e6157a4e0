#pragma once

#include "csflow/diagnostics.hpp"
#include "csflow/flow.hpp"
#include "csflow/geometry.hpp"
#include "csflow/io.hpp"
#include "csflow/polyline.hpp"
#include "csflow/presets.hpp"
#include "csflow/shapes.hpp"
#include "csflow/spectral.hpp"
