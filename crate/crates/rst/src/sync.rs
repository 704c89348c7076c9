#[cfg(feature = "std")]
pub(crate) struct RwLock<T>(std::sync::RwLock<T>);

#[cfg(feature = "std")]
impl<T> RwLock<T> {
    pub(crate) const fn new(v: T) -> Self {
        Self(std::sync::RwLock::new(v))
    }

    pub(crate) fn read(&self) -> std::sync::RwLockReadGuard<'_, T> {
        self.0.read().unwrap_or_else(std::sync::PoisonError::into_inner)
    }

    pub(crate) fn write(&self) -> std::sync::RwLockWriteGuard<'_, T> {
        self.0.write().unwrap_or_else(std::sync::PoisonError::into_inner)
    }
}

#[cfg(not(feature = "std"))]
pub(crate) struct RwLock<T>(spin::RwLock<T>);

#[cfg(not(feature = "std"))]
impl<T> RwLock<T> {
    pub(crate) const fn new(v: T) -> Self {
        Self(spin::RwLock::new(v))
    }

    pub(crate) fn read(&self) -> spin::RwLockReadGuard<'_, T> {
        self.0.read()
    }

    pub(crate) fn write(&self) -> spin::RwLockWriteGuard<'_, T> {
        self.0.write()
    }
}
