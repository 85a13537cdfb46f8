#pragma once

// Umbrella header. kgds/pipeline.hpp additionally needs libcrypto.

#include "kgds/aligner.hpp"
#include "kgds/common.hpp"
#include "kgds/corpus.hpp"
#include "kgds/dataset.hpp"
#include "kgds/kg_builder.hpp"
#include "kgds/kg_split.hpp"
#include "kgds/leakage.hpp"
#include "kgds/registry.hpp"
#include "kgds/rng.hpp"
#include "kgds/rrf.hpp"
#include "kgds/scorer.hpp"
