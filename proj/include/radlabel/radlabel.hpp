#pragma once

#include "radlabel/aggregate.hpp"
#include "radlabel/classify.hpp"
#include "radlabel/conllu.hpp"
#include "radlabel/error.hpp"
#include "radlabel/evaluation.hpp"
#include "radlabel/labels_io.hpp"
#include "radlabel/mentions.hpp"
#include "radlabel/observation.hpp"
#include "radlabel/pipeline.hpp"
#include "radlabel/report.hpp"
#include "radlabel/rules.hpp"
#include "radlabel/uncertainty.hpp"
