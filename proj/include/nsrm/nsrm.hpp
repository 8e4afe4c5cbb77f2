#pragma once

#include "nsrm/annotations.hpp"
#include "nsrm/config.hpp"
#include "nsrm/crop.hpp"
#include "nsrm/error.hpp"
#include "nsrm/eval.hpp"
#include "nsrm/geometry.hpp"
#include "nsrm/handmodel.hpp"
#include "nsrm/keypoints.hpp"
#include "nsrm/loss.hpp"
#include "nsrm/maps.hpp"
#include "nsrm/split.hpp"
#include "nsrm/synthesis.hpp"
#include "nsrm/tensor_io.hpp"
