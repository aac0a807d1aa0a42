use crate::profile::{variation_of, Profile, StepProfile};

/// Total variation of `p` (including the rise from and fall back to zero)
/// and its slope function.
pub fn variation_and_derivative(p: &Profile) -> (f64, StepProfile) {
    let tv = variation_of(p.values());
    let segs: Vec<_> = p.segments().collect();
    if segs.is_empty() {
        return (tv, StepProfile::zero());
    }
    let mut xs = Vec::with_capacity(segs.len() + 1);
    let mut vals = Vec::with_capacity(segs.len());
    xs.push(segs[0].x0);
    for s in &segs {
        vals.push(s.slope());
        xs.push(s.x1);
    }
    (
        tv,
        StepProfile::new(xs, vals).expect("segments are ordered"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_derivative() {
        let (tv, d) = variation_and_derivative(&Profile::tent());
        assert_eq!(tv, 2.0);
        assert_eq!(d.values(), &[1.0, -1.0]);
        assert_eq!(d.breakpoints(), &[-1.0, 0.0, 1.0]);
        assert_eq!(d.variation(), 4.0);
    }

    #[test]
    fn zero_profile() {
        let (tv, d) = variation_and_derivative(&Profile::zero());
        assert_eq!(tv, 0.0);
        assert!(d.is_empty());
    }

    #[test]
    fn jumps_count_in_variation() {
        let p = Profile::new(vec![0.0, 1.0, 1.0, 2.0], vec![1.0, 1.0, 3.0, 3.0]).unwrap();
        let (tv, d) = variation_and_derivative(&p);
        assert_eq!(tv, 1.0 + 2.0 + 3.0);
        assert_eq!(d.values(), &[0.0, 0.0]);
    }
}
