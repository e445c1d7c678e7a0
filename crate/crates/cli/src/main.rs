fn main() {
    println!("caslab");
}
