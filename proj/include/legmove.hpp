#pragma once

#include "legmove/core.hpp"
#include "legmove/evaluate.hpp"
#include "legmove/feature_select.hpp"
#include "legmove/ingest.hpp"
#include "legmove/mask.hpp"
#include "legmove/model.hpp"
#include "legmove/pipeline.hpp"
#include "legmove/selection.hpp"
#include "legmove/synth.hpp"
#include "legmove/tree_export.hpp"
