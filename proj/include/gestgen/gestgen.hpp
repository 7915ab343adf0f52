#pragma once

#include "gestgen/binary_io.hpp"
#include "gestgen/config.hpp"
#include "gestgen/dataset.hpp"
#include "gestgen/error.hpp"
#include "gestgen/gan.hpp"
#include "gestgen/glove.hpp"
#include "gestgen/neuralnet.hpp"
#include "gestgen/pipeline.hpp"
#include "gestgen/random.hpp"
#include "gestgen/retarget.hpp"
#include "gestgen/robot_pose.hpp"
#include "gestgen/sequence.hpp"
#include "gestgen/skeleton.hpp"
#include "gestgen/synth.hpp"
