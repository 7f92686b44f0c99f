namespace kobalab {}
