#pragma once

#include <cstddef>
#include <cstdint>

#include "zeroed/core/dataset.hpp"
#include "zeroed/core/inject.hpp"

namespace zeroed {

/// Clean benchmark table with six attributes:
/// City, State, Zip, Age, Degree, Salary.
/// City -> State and Zip -> City are functional dependencies.
Dataset make_synthetic_people(std::size_t rows, std::uint64_t seed);

/// Injection setup used for the bundled benchmark: 2% of cells for each of
/// the five error types (10% total); rule pairs City->State and City->Zip.
InjectionSpec benchmark_injection_spec(std::uint64_t seed);

}  // namespace zeroed
