#pragma once

#include <actparse/baselines.hpp>
#include <actparse/context_features.hpp>
#include <actparse/core_types.hpp>
#include <actparse/datagen.hpp>
#include <actparse/dp_parser.hpp>
#include <actparse/error.hpp>
#include <actparse/evaluation.hpp>
#include <actparse/io.hpp>
#include <actparse/linear_model.hpp>
#include <actparse/pipeline.hpp>
