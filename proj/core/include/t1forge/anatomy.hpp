#pragma once

#include "t1forge/image.hpp"

namespace t1forge {

/// The two points where the RV meets the LV myocardium. rv1 has the smaller
/// angle about the LV centroid (atan2 in image coordinates, mapped to [0, 2pi)).
struct InsertionPoints {
    Point2 rv1;
    Point2 rv2;
};

/// Centroid of the LV blood pool and myocardium together.
/// Throws DegenerateCentroid when both are empty.
Point2 lv_centroid(const LabelMask& mask);

/// Junctions where background, LV myocardium and RV meet, split into two angular
/// clusters about the LV centroid at the two largest gaps.
/// Throws NoJunctions or SingleCluster.
InsertionPoints insertion_points(const LabelMask& mask);

/// True when no LV blood pool pixel can reach the image border without
/// crossing LV myocardium (4-connectivity). False for an empty blood pool.
bool lv_ring_closed(const LabelMask& mask);

struct MyocardialPartition {
    BinaryMask septum;     // LVIVS
    BinaryMask free_wall;  // LVFW
    Point2 centroid;
    /// The myocardial ring does not enclose the blood pool; the partition is
    /// still computed but should not be trusted.
    bool ring_broken = false;
};

/// Splits the LV myocardium by angle about the LV centroid: the arc between the
/// insertion points that faces the RV centroid is septum, the rest free wall.
/// Coincident insertion points give an empty septum.
/// Throws DegenerateCentroid when the myocardium is empty.
MyocardialPartition partition_myocardium(const LabelMask& mask, const InsertionPoints& points);

struct BloodRois {
    BinaryMask lv;
    BinaryMask rv;
};

/// Pools eroded to a third of their area, then pixels below Q1 - 1.5 IQR of the
/// eroded pool removed. Throws EmptyROI when a pool vanishes.
BloodRois blood_roi(const LabelMask& mask, const ImageGrid& image);

/// Erosion and lower-fence rejection for a single pool.
BinaryMask blood_pool_roi(const BinaryMask& pool, const ImageGrid& image);

struct AnatomyPartition {
    InsertionPoints insertion;
    MyocardialPartition myocardium;
    BloodRois blood;
};

AnatomyPartition analyse_anatomy(const LabelMask& mask, const ImageGrid& image);

}  // namespace t1forge
