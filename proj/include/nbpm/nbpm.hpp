#pragma once

#include "nbpm/error.hpp"
#include "nbpm/special_functions.hpp"
#include "nbpm/rng.hpp"
#include "nbpm/stirling.hpp"
#include "nbpm/distributions.hpp"
#include "nbpm/count_matrix.hpp"
#include "nbpm/priors.hpp"
#include "nbpm/category_model.hpp"
#include "nbpm/inference.hpp"
#include "nbpm/predictive.hpp"
#include "nbpm/parallel.hpp"
#include "nbpm/corpus.hpp"
#include "nbpm/classifier.hpp"
#include "nbpm/ppc.hpp"
#include "nbpm/geweke.hpp"
