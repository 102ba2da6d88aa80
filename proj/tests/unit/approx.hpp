#pragma once

#include "doctest.h"

// Purely relative comparison (doctest's default adds an absolute floor of epsilon).
inline doctest::Approx Rel(double value) { return doctest::Approx(value).scale(0.0); }
