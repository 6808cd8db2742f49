#pragma once

#include "geomedia/document.hpp"
#include "geomedia/error.hpp"
#include "geomedia/geo.hpp"
#include "geomedia/geoservice.hpp"
#include "geomedia/guidance.hpp"
#include "geomedia/legacy_import.hpp"
#include "geomedia/modalities.hpp"
#include "geomedia/scene.hpp"
#include "geomedia/scene_io.hpp"
