#pragma once

// Umbrella header.

#include "smellfix/detect.hpp"
#include "smellfix/diff.hpp"
#include "smellfix/fixer.hpp"
#include "smellfix/io.hpp"
#include "smellfix/lexer.hpp"
#include "smellfix/parser.hpp"
#include "smellfix/pipeline.hpp"
#include "smellfix/refactor.hpp"
#include "smellfix/result.hpp"
#include "smellfix/review.hpp"
