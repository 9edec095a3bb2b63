#pragma once

#include "arlab/acceptance.hpp"
#include "arlab/anchors.hpp"
#include "arlab/annulus.hpp"
#include "arlab/builders.hpp"
#include "arlab/cell_index.hpp"
#include "arlab/commands.hpp"
#include "arlab/config.hpp"
#include "arlab/geometry.hpp"
#include "arlab/measure.hpp"
#include "arlab/measure_io.hpp"
#include "arlab/norms.hpp"
#include "arlab/numeric.hpp"
#include "arlab/oracle.hpp"
#include "arlab/oscillatory.hpp"
#include "arlab/parallel.hpp"
#include "arlab/profiles.hpp"
#include "arlab/rng.hpp"
#include "arlab/version.hpp"
