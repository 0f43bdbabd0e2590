#pragma once

#include "engram/analysis.hpp"
#include "engram/backends.hpp"
#include "engram/config.hpp"
#include "engram/fabric_model.hpp"
#include "engram/ngram_indexer.hpp"
#include "engram/retrieval_engine.hpp"
#include "engram/settings.hpp"
#include "engram/table_file.hpp"
