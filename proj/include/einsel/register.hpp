#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Labeled tensor-product registers. Basis indices are big-endian over the
// subsystem order: the first subsystem is the most significant digit.

namespace einsel {

struct Subsystem {
    std::string label;
    std::size_t dim = 2;
};

class Register {
public:
    Register() = default;
    // Throws std::invalid_argument on duplicate labels, dims < 2, or a total
    // dimension above the 2^24 guard.
    explicit Register(std::vector<Subsystem> subsystems);

    // Convenience: qubit register from labels, in order.
    static Register qubits(const std::vector<std::string>& labels);

    std::size_t count() const { return subs_.size(); }
    std::size_t dim() const { return dim_; }
    const Subsystem& at(std::size_t i) const { return subs_.at(i); }
    const std::vector<Subsystem>& subsystems() const { return subs_; }

    bool contains(std::string_view label) const;
    // Position of a label; throws std::domain_error if absent.
    std::size_t position(std::string_view label) const;

    std::size_t stride(std::size_t i) const { return strides_.at(i); }
    std::size_t digit(std::size_t basis_index, std::size_t i) const {
        return (basis_index / strides_[i]) % subs_[i].dim;
    }

    // Sub-register of the given labels, preserving this register's order.
    // Throws std::domain_error on unknown labels, std::invalid_argument on
    // duplicates or an empty selection.
    Register subset(const std::vector<std::string>& labels) const;

    // Same labels and dims in the same order.
    bool same_layout(const Register& other) const;

    std::vector<std::string> labels() const;

private:
    std::vector<Subsystem> subs_;
    std::vector<std::size_t> strides_;
    std::size_t dim_ = 1;
};

// Disjoint blocks of labels covering the register exactly.
class Partition {
public:
    // Throws std::invalid_argument unless the blocks are nonempty, disjoint,
    // and cover every label of reg.
    Partition(const Register& reg, std::vector<std::vector<std::string>> blocks);

    const std::vector<std::vector<std::string>>& blocks() const { return blocks_; }
    std::size_t block_count() const { return blocks_.size(); }

private:
    std::vector<std::vector<std::string>> blocks_;
};

}  // namespace einsel
