#pragma once

#include "stegogame/bitstring.hpp"
#include "stegogame/descriptors.hpp"
#include "stegogame/detectors.hpp"
#include "stegogame/errors.hpp"
#include "stegogame/experiment.hpp"
#include "stegogame/game.hpp"
#include "stegogame/math.hpp"
#include "stegogame/prng.hpp"
#include "stegogame/probsets.hpp"
#include "stegogame/random.hpp"
#include "stegogame/schemes.hpp"
