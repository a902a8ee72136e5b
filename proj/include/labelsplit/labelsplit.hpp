#ifndef LABELSPLIT_LABELSPLIT_HPP
#define LABELSPLIT_LABELSPLIT_HPP

#include "labelsplit/errors.hpp"
#include "labelsplit/time.hpp"
#include "labelsplit/event_model.hpp"
#include "labelsplit/csv.hpp"
#include "labelsplit/ingest.hpp"
#include "labelsplit/relabel.hpp"
#include "labelsplit/ordering_stats.hpp"
#include "labelsplit/stat_tests.hpp"
#include "labelsplit/info_gain.hpp"
#include "labelsplit/evaluator.hpp"
#include "labelsplit/report_json.hpp"

#endif // LABELSPLIT_LABELSPLIT_HPP
