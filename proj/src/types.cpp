// Copyright 2026 The vground Authors.
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

#include "vground/types.hpp"

#include "vground/errors.hpp"

namespace vground {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::block: return "block";
    case Category::mug: return "mug";
    case Category::bottle: return "bottle";
    case Category::fruit: return "fruit";
  }
  return "?";
}

std::string_view to_string(Color c) {
  switch (c) {
    case Color::red: return "red";
    case Color::green: return "green";
    case Color::blue: return "blue";
    case Color::yellow: return "yellow";
  }
  return "?";
}

std::string_view to_string(Size s) {
  return s == Size::small ? "small" : "large";
}

std::optional<Category> parse_category(std::string_view s) {
  for (auto c : kAllCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::optional<Color> parse_color(std::string_view s) {
  for (auto c : kAllColors) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::optional<Size> parse_size(std::string_view s) {
  for (auto z : kAllSizes) {
    if (to_string(z) == s) return z;
  }
  return std::nullopt;
}

int attribute_class(const ObjectAttributes& a) {
  return (static_cast<int>(a.category) * kNumColors +
          static_cast<int>(a.color)) *
             kNumSizes +
         static_cast<int>(a.size);
}

ObjectAttributes attributes_from_class(int cls) {
  if (cls < 0 || cls >= kNumAttributeClasses) {
    throw ValidationError("attribute class out of range: " +
                          std::to_string(cls));
  }
  ObjectAttributes a;
  a.size = static_cast<Size>(cls % kNumSizes);
  cls /= kNumSizes;
  a.color = static_cast<Color>(cls % kNumColors);
  a.category = static_cast<Category>(cls / kNumColors);
  return a;
}

AttributeVector one_hot(const ObjectAttributes& a) {
  AttributeVector v = AttributeVector::Zero();
  v(static_cast<int>(a.category)) = 1.0;
  v(kNumCategories + static_cast<int>(a.color)) = 1.0;
  v(kNumCategories + kNumColors + static_cast<int>(a.size)) = 1.0;
  return v;
}

namespace {

int hot_index(const AttributeVector& v, int offset, int width) {
  int hot = -1;
  for (int i = 0; i < width; ++i) {
    const double x = v(offset + i);
    if (x == 1.0) {
      if (hot >= 0) return -1;
      hot = i;
    } else if (x != 0.0) {
      return -1;
    }
  }
  return hot;
}

}  // namespace

ObjectAttributes decode_attributes(const AttributeVector& v) {
  const int cat = hot_index(v, 0, kNumCategories);
  const int col = hot_index(v, kNumCategories, kNumColors);
  const int siz = hot_index(v, kNumCategories + kNumColors, kNumSizes);
  if (cat < 0 || col < 0 || siz < 0) {
    throw ValidationError("attribute block is not one-hot per group");
  }
  return {static_cast<Category>(cat), static_cast<Color>(col),
          static_cast<Size>(siz)};
}

}  // namespace vground
