#pragma once

#include "looptrack/embedding.hpp"
#include "looptrack/error.hpp"
#include "looptrack/features.hpp"
#include "looptrack/homology.hpp"
#include "looptrack/ingest.hpp"
#include "looptrack/io.hpp"
#include "looptrack/metric.hpp"
#include "looptrack/pipeline.hpp"
#include "looptrack/random.hpp"
#include "looptrack/svg_plot.hpp"
#include "looptrack/sweep.hpp"
#include "looptrack/synth.hpp"
#include "looptrack/track.hpp"
#include "looptrack/union_find.hpp"
