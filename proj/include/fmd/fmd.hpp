#pragma once

// Umbrella header.

#include "fmd/abc.hpp"
#include "fmd/augment.hpp"
#include "fmd/corpus.hpp"
#include "fmd/embedding.hpp"
#include "fmd/errors.hpp"
#include "fmd/frechet.hpp"
#include "fmd/gaussian.hpp"
#include "fmd/midi.hpp"
#include "fmd/mtf.hpp"
#include "fmd/rng.hpp"
#include "fmd/song.hpp"
#include "fmd/version.hpp"
