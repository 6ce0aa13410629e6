#pragma once

#include "clothparse/crf/energy.hpp"
#include "clothparse/crf/instance.hpp"
#include "clothparse/crf/map.hpp"
#include "clothparse/crf/mean_field.hpp"
#include "clothparse/crf/params.hpp"
#include "clothparse/error.hpp"
#include "clothparse/gate/features.hpp"
#include "clothparse/gate/forward.hpp"
#include "clothparse/gate/grad_check.hpp"
#include "clothparse/gate/loss.hpp"
#include "clothparse/gate/model.hpp"
#include "clothparse/gate/model_io.hpp"
#include "clothparse/gate/train.hpp"
#include "clothparse/hmt1.hpp"
#include "clothparse/manifest.hpp"
#include "clothparse/metrics/iou.hpp"
#include "clothparse/metrics/outfit.hpp"
#include "clothparse/palette.hpp"
#include "clothparse/png_io.hpp"
#include "clothparse/presence.hpp"
#include "clothparse/random.hpp"
#include "clothparse/retrieval/index.hpp"
#include "clothparse/softmax.hpp"
#include "clothparse/superpixel/color.hpp"
#include "clothparse/superpixel/connectivity.hpp"
#include "clothparse/superpixel/slic.hpp"
#include "clothparse/superpixel/smoothing.hpp"
#include "clothparse/synthetic/datasets.hpp"
#include "clothparse/tensor.hpp"
#include "clothparse/tune/nelder_mead.hpp"
#include "clothparse/tune/tune_crf.hpp"
