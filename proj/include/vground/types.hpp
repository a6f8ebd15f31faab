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

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace vground {

using Vec3 = Eigen::Vector3d;

enum class Category { block, mug, bottle, fruit };
enum class Color { red, green, blue, yellow };
enum class Size { small, large };

inline constexpr int kNumCategories = 4;
inline constexpr int kNumColors = 4;
inline constexpr int kNumSizes = 2;

// Width of the one-hot attribute block: category ⊕ color ⊕ size.
inline constexpr int kAttributeDim = kNumCategories + kNumColors + kNumSizes;
// Number of distinct (category, color, size) combinations.
inline constexpr int kNumAttributeClasses =
    kNumCategories * kNumColors * kNumSizes;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::block, Category::mug, Category::bottle, Category::fruit};
inline constexpr std::array<Color, kNumColors> kAllColors = {
    Color::red, Color::green, Color::blue, Color::yellow};
inline constexpr std::array<Size, kNumSizes> kAllSizes = {Size::small,
                                                          Size::large};

std::string_view to_string(Category c);
std::string_view to_string(Color c);
std::string_view to_string(Size s);

std::optional<Category> parse_category(std::string_view s);
std::optional<Color> parse_color(std::string_view s);
std::optional<Size> parse_size(std::string_view s);

struct ObjectAttributes {
  Category category = Category::block;
  Color color = Color::red;
  Size size = Size::small;

  bool operator==(const ObjectAttributes&) const = default;
};

// Dense index in [0, kNumAttributeClasses).
int attribute_class(const ObjectAttributes& a);
ObjectAttributes attributes_from_class(int cls);

using AttributeVector = Eigen::Matrix<double, kAttributeDim, 1>;

AttributeVector one_hot(const ObjectAttributes& a);
// Inverse of one_hot; throws ValidationError unless every group has exactly
// one hot entry.
ObjectAttributes decode_attributes(const AttributeVector& v);

// 3-DoF end-effector displacement plus a gripper command in [0, 1].
struct ActionVector {
  Vec3 delta = Vec3::Zero();
  double grip = 0.0;

  bool grip_closed() const { return grip >= 0.5; }
};

}  // namespace vground
