// Copyright 2026 The GazeBench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEBENCH_PORTER_STEMMER_H_
#define GAZEBENCH_PORTER_STEMMER_H_

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace gazebench {

// The classic five-step suffix stripper for lowercase English words.
// Words of one or two letters are returned unchanged.
class PorterStemmer {
 public:
  std::string stem(std::string_view word) {
    b_.assign(word);
    k_ = static_cast<int>(b_.size()) - 1;
    if (k_ <= 1) return b_;
    step1ab();
    if (k_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    return b_.substr(0, k_ + 1);
  }

 private:
  bool cons(int i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int m() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!cons(i)) return true;
    }
    return false;
  }

  bool double_consonant(int j) const {
    if (j < 1 || b_[j] != b_[j - 1]) return false;
    return cons(j);
  }

  // Consonant-vowel-consonant ending at i, the last consonant not w, x or y.
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    const char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view s) {
    const int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (std::string_view(b_).substr(k_ - len + 1, len) != s) return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(std::string_view s) {
    b_.resize(j_ + 1);
    b_ += s;
    k_ = j_ + static_cast<int>(s.size());
  }

  void replace_if_measure(std::string_view s) {
    if (m() > 0) set_to(s);
  }

  // Plurals and -ed / -ing.
  void step1ab() {
    if (b_[k_] == 's') {
      if (ends("sses")) {
        k_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
    }
    if (ends("eed")) {
      if (m() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_consonant(k_)) {
        --k_;
        const char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else if (m() == 1 && cvc(k_)) {
        set_to("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
  }

  bool try_rules(std::initializer_list<std::pair<std::string_view,
                                                 std::string_view>> rules) {
    for (const auto& [suffix, repl] : rules) {
      if (ends(suffix)) {
        replace_if_measure(repl);
        return true;
      }
    }
    return false;
  }

  // Double suffixes to single ones.
  void step2() {
    switch (b_[k_ - 1]) {
      case 'a':
        try_rules({{"ational", "ate"}, {"tional", "tion"}});
        break;
      case 'c':
        try_rules({{"enci", "ence"}, {"anci", "ance"}});
        break;
      case 'e':
        try_rules({{"izer", "ize"}});
        break;
      case 'l':
        try_rules({{"bli", "ble"},
                   {"alli", "al"},
                   {"entli", "ent"},
                   {"eli", "e"},
                   {"ousli", "ous"}});
        break;
      case 'o':
        try_rules({{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}});
        break;
      case 's':
        try_rules({{"alism", "al"},
                   {"iveness", "ive"},
                   {"fulness", "ful"},
                   {"ousness", "ous"}});
        break;
      case 't':
        try_rules({{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}});
        break;
      case 'g':
        try_rules({{"logi", "log"}});
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (b_[k_]) {
      case 'e':
        try_rules({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}});
        break;
      case 'i':
        try_rules({{"iciti", "ic"}});
        break;
      case 'l':
        try_rules({{"ical", "ic"}, {"ful", ""}});
        break;
      case 's':
        try_rules({{"ness", ""}});
        break;
      default:
        break;
    }
  }

  // Drops -ant, -ence and friends when the stem measure exceeds one.
  void step4() {
    bool found = false;
    switch (b_[k_ - 1]) {
      case 'a':
        found = ends("al");
        break;
      case 'c':
        found = ends("ance") || ends("ence");
        break;
      case 'e':
        found = ends("er");
        break;
      case 'i':
        found = ends("ic");
        break;
      case 'l':
        found = ends("able") || ends("ible");
        break;
      case 'n':
        found = ends("ant") || ends("ement") || ends("ment") || ends("ent");
        break;
      case 'o':
        found = (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) ||
                ends("ou");
        break;
      case 's':
        found = ends("ism");
        break;
      case 't':
        found = ends("ate") || ends("iti");
        break;
      case 'u':
        found = ends("ous");
        break;
      case 'v':
        found = ends("ive");
        break;
      case 'z':
        found = ends("ize");
        break;
      default:
        break;
    }
    if (found && m() > 1) k_ = j_;
  }

  // Final -e and -ll.
  void step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      const int a = m();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    if (b_[k_] == 'l' && double_consonant(k_) && m() > 1) --k_;
  }

  std::string b_;
  int k_ = 0;
  int j_ = 0;
};

inline std::string porter_stem(std::string_view word) {
  return PorterStemmer().stem(word);
}

}  // namespace gazebench

#endif  // GAZEBENCH_PORTER_STEMMER_H_
