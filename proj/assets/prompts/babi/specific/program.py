    def story(self):
        self.mary_moved_to_the_bathroom()
        self.sandra_journeyed_to_the_bedroom()
        self.mary_got_the_football_there()
        self.john_went_to_the_kitchen()
        self.mary_went_back_to_the_kitchen()
        self.mary_dropped_the_football()
        self.mary_journeyed_to_the_garden()
        ## Question: Where is the football?
        print(self.football.location)

    def mary_moved_to_the_bathroom(self):
        self.Mary.location = "bathroom"

    def sandra_journeyed_to_the_bedroom(self):
        self.Sandra.location = "bedroom"

    def mary_got_the_football_there(self):
        self.Mary.inventory.append("football")
        self.football.carrier = "Mary"
        self.football.location = "bathroom"

    def john_went_to_the_kitchen(self):
        self.John.location = "kitchen"

    def mary_went_back_to_the_kitchen(self):
        self.Mary.location = "kitchen"
        self.football.location = "kitchen"

    def mary_dropped_the_football(self):
        self.football.carrier = None
        self.football.location = "kitchen"

    def mary_journeyed_to_the_garden(self):
        self.Mary.location = "garden"
