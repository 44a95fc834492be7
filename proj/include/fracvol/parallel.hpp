#pragma once
/// @file parallel.hpp
/// Execution policy shared by the Monte Carlo engine and the experiments.

namespace fracvol {

enum class Execution { serial, parallel };

/// Worker count for parallel regions: FRACVOL_THREADS when it holds a
/// positive integer, otherwise the OpenMP default. Results never depend on it.
int worker_threads();

}  // namespace fracvol
