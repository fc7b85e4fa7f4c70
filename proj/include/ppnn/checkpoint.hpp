#pragma once

#include <string>

#include "ppnn/model.hpp"

namespace ppnn {

// Binary container (magic "PPCK") holding the named trainable tensors and the
// architecture fingerprint. Loading verifies the fingerprint and every tensor
// name/shape against the model built from the caller's config.
void save_checkpoint(const Model& model, const std::string& path);
void load_checkpoint(Model& model, const std::string& path);

// Fingerprint stored in a checkpoint file, without loading tensors.
std::uint64_t peek_checkpoint_fingerprint(const std::string& path);

}  // namespace ppnn
