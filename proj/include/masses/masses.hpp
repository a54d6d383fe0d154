#ifndef MASSES_MASSES_HPP
#define MASSES_MASSES_HPP

#include "masses/answer_model.hpp"
#include "masses/baseline.hpp"
#include "masses/embedding_table.hpp"
#include "masses/error.hpp"
#include "masses/grouping.hpp"
#include "masses/ingestion.hpp"
#include "masses/metrics.hpp"
#include "masses/report.hpp"
#include "masses/taxonomy.hpp"
#include "masses/wups.hpp"

#endif  // MASSES_MASSES_HPP
