#pragma once

// Convenience umbrella for the whole library. The HTTP client is excluded
// because it drags in a socket dependency; include ckg/http_client.hpp
// explicitly where a remote model endpoint is needed.

#include "ckg/analytics.hpp"
#include "ckg/csv.hpp"
#include "ckg/errors.hpp"
#include "ckg/eval.hpp"
#include "ckg/features.hpp"
#include "ckg/features_io.hpp"
#include "ckg/graph.hpp"
#include "ckg/graph_io.hpp"
#include "ckg/retrieval.hpp"
#include "ckg/stats.hpp"
#include "ckg/text.hpp"
