# Reports Package
