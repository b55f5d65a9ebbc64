#pragma once

// Umbrella header. Individual headers are self-contained; include this one
// when pulling in the whole workbench is simpler than picking pieces.

#include "toxcls/bow.hpp"
#include "toxcls/classifiers/knn.hpp"
#include "toxcls/classifiers/lda.hpp"
#include "toxcls/classifiers/naive_bayes.hpp"
#include "toxcls/classifiers/svm.hpp"
#include "toxcls/cnn.hpp"
#include "toxcls/corpus.hpp"
#include "toxcls/csv.hpp"
#include "toxcls/embeddings.hpp"
#include "toxcls/error.hpp"
#include "toxcls/eval.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/model_io.hpp"
#include "toxcls/numerics.hpp"
#include "toxcls/report.hpp"
#include "toxcls/rng.hpp"
#include "toxcls/stopwords.hpp"
#include "toxcls/svg.hpp"
#include "toxcls/textprep.hpp"
#include "toxcls/viz.hpp"
