#pragma once

#include "cogeval/alignment.hpp"
#include "cogeval/calculus.hpp"
#include "cogeval/commands.hpp"
#include "cogeval/diagnostics.hpp"
#include "cogeval/evaluate.hpp"
#include "cogeval/ingest.hpp"
#include "cogeval/lexicon.hpp"
#include "cogeval/profile.hpp"
#include "cogeval/registry.hpp"
#include "cogeval/scorers.hpp"
#include "cogeval/tuning.hpp"
#include "cogeval/types.hpp"
