#pragma once

#include "journeys/bleu.hpp"
#include "journeys/concept_vector.hpp"
#include "journeys/cooccurrence.hpp"
#include "journeys/error.hpp"
#include "journeys/eval.hpp"
#include "journeys/factorize.hpp"
#include "journeys/icpc.hpp"
#include "journeys/item.hpp"
#include "journeys/kmeans.hpp"
#include "journeys/multimodal.hpp"
#include "journeys/naming.hpp"
#include "journeys/synth.hpp"
#include "journeys/tfidf.hpp"
