#include "elsim/skill_id.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

namespace elsim {

SkillId::SkillId(std::vector<int> letters) : letters_(std::move(letters)) {
  for (int v : letters_) {
    if (v < 0) throw std::domain_error("SkillId: negative letter value");
  }
}

SkillId SkillId::parse(const std::string& text) {
  if (text.empty() || text == "root") return SkillId{};
  std::vector<int> letters;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, '-')) {
    if (part.empty()) throw std::domain_error("SkillId: malformed id string '" + text + "'");
    letters.push_back(std::stoi(part));
  }
  return SkillId(std::move(letters));
}

SkillId SkillId::parent() const {
  if (is_root()) throw std::domain_error("SkillId: root has no parent");
  std::vector<int> letters(letters_.begin(), letters_.end() - 1);
  return SkillId(std::move(letters));
}

SkillId SkillId::child(int letter) const {
  if (letter < 0) throw std::domain_error("SkillId: negative letter value");
  std::vector<int> letters = letters_;
  letters.push_back(letter);
  return SkillId(std::move(letters));
}

int SkillId::last_letter() const {
  if (is_root()) throw std::domain_error("SkillId: root has no last letter");
  return letters_.back();
}

bool SkillId::is_prefix_of(const SkillId& other) const {
  if (letters_.size() > other.letters_.size()) return false;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (letters_[i] != other.letters_[i]) return false;
  }
  return true;
}

std::string SkillId::str() const {
  std::string out;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i > 0) out += '-';
    out += std::to_string(letters_[i]);
  }
  return out;
}

std::ostream& operator<<(std::ostream& out, const SkillId& id) {
  return out << (id.is_root() ? "root" : id.str());
}

}  // namespace elsim
