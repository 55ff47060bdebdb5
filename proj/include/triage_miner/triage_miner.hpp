#pragma once

#include "triage_miner/attribute.hpp"
#include "triage_miner/cluster.hpp"
#include "triage_miner/csv.hpp"
#include "triage_miner/error.hpp"
#include "triage_miner/ingest.hpp"
#include "triage_miner/mine.hpp"
#include "triage_miner/oracle.hpp"
#include "triage_miner/pipeline.hpp"
#include "triage_miner/report.hpp"
#include "triage_miner/rules.hpp"
#include "triage_miner/synthesize.hpp"
