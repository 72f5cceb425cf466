#pragma once

#include <filesystem>

#include "batopt/bucket.hpp"
#include "batopt/ecm.hpp"
#include "batopt/spm_params.hpp"

namespace batopt {

struct EcmConfig {
  EcmParams ecm;
  SchmalstiegParams schmalstieg;
};

// Parameter documents are JSON objects whose keys mirror the parameter
// structs. Every field must be present; unknown keys are rejected. Table
// paths are resolved relative to the document.
BucketParams load_bucket_params(const std::filesystem::path& path);
EcmConfig load_ecm_params(const std::filesystem::path& path);
SpmParams load_spm_params(const std::filesystem::path& path);

// Directory holding the shipped defaults (BATOPT_DATA_DIR overrides).
std::filesystem::path data_dir();
BucketParams default_bucket_params();
EcmConfig default_ecm_params();
SpmParams default_spm_params();

}  // namespace batopt
